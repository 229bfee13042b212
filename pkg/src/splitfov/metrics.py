"""Latency statistics and reporting.

Medians and IQRs use linear-interpolation quantiles so results are
reproducible from the raw CSVs with any tool using the same rule.
Throughput is computed per frame as payload_bits / network_seconds and
median-aggregated, which keeps a single outlier frame from skewing the
reported Mbps.
"""

from __future__ import annotations

import csv
import dataclasses
from dataclasses import dataclass
from typing import Optional, Sequence, TypeVar

import numpy as np

R = TypeVar("R")


def median(samples: Sequence[float]) -> float:
    """Linear-interpolation quantile at 0.5."""
    if len(samples) == 0:
        raise ValueError("median of empty sample set")
    return float(np.quantile(np.asarray(samples, dtype=np.float64), 0.5))


def iqr(samples: Sequence[float]) -> float:
    """q(0.75) - q(0.25) with linear-interpolation quantiles."""
    if len(samples) == 0:
        raise ValueError("iqr of empty sample set")
    x = np.asarray(samples, dtype=np.float64)
    return float(np.quantile(x, 0.75) - np.quantile(x, 0.25))


def mbps(payload_bytes: int, network_seconds: float) -> float:
    """Megabits per second: bytes * 8 / seconds / 1e6."""
    if network_seconds <= 0:
        raise ValueError(f"network_seconds must be positive, got {network_seconds}")
    return payload_bytes * 8.0 / network_seconds / 1e6


def improvement_pct(t_native_ms: float, t_split_ms: float) -> float:
    """Latency improvement of split over native: (native - split) / split * 100."""
    if t_native_ms <= 0 or t_split_ms <= 0:
        raise ValueError("frame times must be positive")
    return (t_native_ms - t_split_ms) / t_split_ms * 100.0


def fps_display(median_total_ms: float) -> int:
    """Frames per second as displayed next to a median frame time."""
    return round(1000.0 / median_total_ms)


@dataclass(frozen=True)
class Summary:
    """Per-stage medians/IQRs plus the headline end-to-end numbers."""

    frame_count: int
    stage_median_ms: dict[str, float]
    stage_iqr_ms: dict[str, float]
    median_fps: int
    mbps: Optional[float]
    server_stage_median_ms: Optional[dict[str, float]] = None
    server_stage_iqr_ms: Optional[dict[str, float]] = None
    server_dims: Optional[str] = None


def _stage_fields(record) -> list[str]:
    return [f.name for f in dataclasses.fields(record) if f.name.endswith("_ms")]


def summarize(client_records: Sequence, server_records: Optional[Sequence] = None,
              server_dims: Optional[str] = None) -> Summary:
    """Aggregates per-frame records into medians, IQRs, fps, and Mbps.

    `client_records` must carry *_ms stage fields plus total_ms and
    bytes_received; `server_records` (optional) carry their own *_ms
    fields. Frames with a zero network window (local modes, infinite
    simulated bandwidth) are excluded from the Mbps median.
    """
    if len(client_records) == 0:
        raise ValueError("no client records to summarize")
    stages = _stage_fields(client_records[0])
    med = {s: median([getattr(r, s) for r in client_records]) for s in stages}
    spread = {s: iqr([getattr(r, s) for r in client_records]) for s in stages}

    rates = [
        mbps(r.bytes_received, r.network_ms / 1000.0)
        for r in client_records
        if r.network_ms > 0
    ]
    rate = median(rates) if rates else None

    server_med = server_iqr = None
    if server_records:
        sstages = _stage_fields(server_records[0])
        server_med = {s: median([getattr(r, s) for r in server_records]) for s in sstages}
        server_iqr = {s: iqr([getattr(r, s) for r in server_records]) for s in sstages}

    return Summary(
        frame_count=len(client_records),
        stage_median_ms=med,
        stage_iqr_ms=spread,
        median_fps=fps_display(med["total_ms"]),
        mbps=rate,
        server_stage_median_ms=server_med,
        server_stage_iqr_ms=server_iqr,
        server_dims=server_dims,
    )


def _fmt(v: Optional[float]) -> str:
    return "-" if v is None else f"{v:.2f}"


def render_table(summary: Summary, title: str = "Client profile") -> str:
    """Aligned text tables in the shape of the client/server profiling tables."""
    dims = summary.server_dims or "-"
    med = summary.stage_median_ms
    lines = [
        f"{title} ({summary.frame_count} frames, all times median ms)",
        f"  end-to-end: {med['total_ms']:.2f} ms/frame"
        f" ({summary.median_fps} fps, IQR = {summary.stage_iqr_ms['total_ms']:.3f})",
    ]
    headers = ["Server Dims", "Network", "Decode", "Merge", "Mbps"]
    row = [dims, _fmt(med.get("network_ms")), _fmt(med.get("decode_ms")),
           _fmt(med.get("merge_ms")), _fmt(summary.mbps)]
    widths = [max(len(h), len(v)) for h, v in zip(headers, row)]
    lines.append("  " + "  ".join(h.ljust(w) for h, w in zip(headers, widths)))
    lines.append("  " + "  ".join(v.ljust(w) for v, w in zip(row, widths)))
    extras = [s for s in med if s not in ("network_ms", "decode_ms", "merge_ms", "total_ms")]
    if extras:
        lines.append("  (" + ", ".join(f"{s[:-3]} {med[s]:.2f} ms" for s in extras) + ")")

    if summary.server_stage_median_ms is not None:
        smed = summary.server_stage_median_ms
        lines.append("Server profile")
        sheaders = ["Server Dims", "Draw Time", "Encode Time"]
        srow = [dims, _fmt(smed.get("draw_ms")), _fmt(smed.get("encode_ms"))]
        swidths = [max(len(h), len(v)) for h, v in zip(sheaders, srow)]
        lines.append("  " + "  ".join(h.ljust(w) for h, w in zip(sheaders, swidths)))
        lines.append("  " + "  ".join(v.ljust(w) for v, w in zip(srow, swidths)))
        sextras = [s for s in smed if s not in ("draw_ms", "encode_ms")]
        if sextras:
            lines.append("  (" + ", ".join(f"{s[:-3]} {smed[s]:.2f} ms" for s in sextras) + ")")
    return "\n".join(lines)


def write_summary_kv(summary: Summary, path: str) -> None:
    """Machine-readable key=value dump of a Summary."""
    with open(path, "w", encoding="ascii") as f:
        f.write(f"frame_count={summary.frame_count}\n")
        f.write(f"median_fps={summary.median_fps}\n")
        if summary.mbps is not None:
            f.write(f"mbps={summary.mbps!r}\n")
        for s, v in summary.stage_median_ms.items():
            f.write(f"client.{s}.median={v!r}\n")
        for s, v in summary.stage_iqr_ms.items():
            f.write(f"client.{s}.iqr={v!r}\n")
        for name, d in (("median", summary.server_stage_median_ms),
                        ("iqr", summary.server_stage_iqr_ms)):
            if d:
                for s, v in d.items():
                    f.write(f"server.{s}.{name}={v!r}\n")


def write_csv(records: Sequence, path: str) -> None:
    """Writes dataclass records as CSV; floats use shortest round-trip repr."""
    if len(records) == 0:
        raise ValueError("no records to write")
    names = [f.name for f in dataclasses.fields(records[0])]
    with open(path, "w", newline="", encoding="ascii") as f:
        writer = csv.writer(f)
        writer.writerow(names)
        for r in records:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in
                             (getattr(r, n) for n in names)])


def read_csv(path: str, record_type: type[R]) -> list[R]:
    """Reads CSV written by `write_csv` back into `record_type` instances."""
    fields = {f.name: f.type for f in dataclasses.fields(record_type)}
    out = []
    with open(path, newline="", encoding="ascii") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or set(header) != set(fields):
            raise ValueError(f"CSV header {header} does not match {record_type.__name__}")
        for row in reader:
            kwargs = {}
            for name, raw in zip(header, row):
                typ = fields[name]
                is_int = typ in (int, "int")
                kwargs[name] = int(raw) if is_int else float(raw)
            out.append(record_type(**kwargs))
    return out
