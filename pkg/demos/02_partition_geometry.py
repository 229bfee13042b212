"""
Partition geometry and the pixel budget
=======================================

Where the foveal rectangles sit, how big the reduced peripheral render is,
and why drawing the periphery at scale 0.6 shades exactly 36% of the rays.
"""

from splitfov import Eye, PartitionSpec, foveal_rect_stereo, reduced_dims, validate

# The headset-scale default: 2400x1080 across both eyes, a 512x360 foveal
# window per eye, periphery at scale 0.6.
spec = PartitionSpec.from_full(2400, 1080, 512, 360, 0.6)
print("full stereo: ", spec.full_w, "x", spec.full_h)
print("per eye:     ", spec.eye_w, "x", spec.eye_h)
print("fovea/eye:   ", spec.fov_w, "x", spec.fov_h)

# Foveal rects are centered per eye, then placed in stereo-frame
# coordinates (the right eye shifts by one eye width).
for eye in (Eye.LEFT, Eye.RIGHT):
    r = foveal_rect_stereo(spec, eye)
    print(f"{eye.name:>5} fovea at x={r.x} y={r.y} ({r.w}x{r.h})")

# The reduced peripheral render rounds each axis separately.
rw, rh = reduced_dims(spec)
print("reduced periphery:", rw, "x", rh)

# Scale 0.6 on both axes means 0.36x the pixels, and at these dimensions
# the product is exact, not approximate.
full_px = spec.full_w * spec.full_h
assert rw * rh == 0.36 * full_px
print(f"pixel budget: {rw * rh} / {full_px} = {rw * rh / full_px:.2f}")

# The client draws the reduced frame, the server draws the two foveae:
foveal_px = 2 * spec.fov_w * spec.fov_h
print(f"client rays/frame: {rw * rh}   server rays/frame: {foveal_px}")
print(f"client draw is {100 * (1 - rw * rh / full_px):.0f}% cheaper than full rate")

# Bad geometry is rejected with a reason rather than clipped silently.
bad = PartitionSpec.from_full(600, 270, 400, 90, 0.6)
print("validate(600x270 with 400-wide fovea):", validate(bad))
