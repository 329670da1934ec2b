"""Lift 2D landmarks plus a depth patch into metric 3D points.

Builds one raw frame by hand: a person standing 2 m from the sensor,
landmarks laid out in image space, each with a small depth window. The
lift recovers X and Y in metres from the pixel offsets scaled by the
measured depth.
"""
import numpy as np

from skelact import (LiftConfig, RawFrame, estimate_subject_distance,
                     lift_frame)

P = 21
pitch = 5.0  # mm per pixel at 1 m (a 200 px/m focal length)
cx, cy = 160.0, 120.0

# Thirteen landmarks roughly shaped like a standing person, in pixels.
lm = np.array([
    [160, 60],             # head
    [185, 90], [135, 90],  # shoulders
    [200, 120], [120, 120],
    [205, 150], [115, 150],
    [175, 150], [145, 150],
    [178, 190], [142, 190],
    [180, 228], [140, 228],
], dtype=float)

depth_mm = 2000.0
patches = np.full((13, P, P), depth_mm)
torso = np.full(400, depth_mm)

frame = RawFrame(
    timestamp=0.0,
    landmarks2d=lm,
    visibility=np.ones(13),
    patches=patches,
    torso_samples=torso,
    pixel_pitch_at_1m=pitch,
    principal_point=(cx, cy),
)

dist = estimate_subject_distance(torso, LiftConfig())
print(f"subject distance from torso samples: {dist:.3f} m")

skel = lift_frame(frame)
print("lifted points (m):")
for name, (x, y, z) in zip(
        ["nose", "l_sho", "r_sho", "l_elb", "r_elb", "l_wri", "r_wri",
         "l_hip", "r_hip", "l_kne", "r_kne", "l_hee", "r_hee"],
        skel.points):
    print(f"  {name:6s} x={x:+.3f} y={y:+.3f} z={z:.3f}")

# Sanity: the wrists sit ~45 px from the principal point horizontally,
# which at 2 m and 5 mm/px/m is 45 * 5 * 2 = 450 mm.
lw = skel.points[5]
print(f"\nleft wrist |x| = {abs(lw[0]):.3f} m (expected 0.450)")
