"""
Velocity prediction from a window of good samples
=================================================

Each good flow sample contributes a velocity and a timestamp. When the
sensor loses track, every stored entry is extrapolated to the current time
with an acceleration fitted against the newest entry, and the results are
averaged.
"""

# %%
# A window of three velocities on a ramp of 1 m/s^2
from tunnel_odometry import GoodSampleWindow, back_fit_accelerations, predict_velocity
from tunnel_odometry.velocity_predictor import predicted_velocities

window = GoodSampleWindow(window_len=8)
for v, t in [(1.0, 0.0), (2.0, 1.0), (3.0, 2.0)]:
    window.record(v, t)

print("accelerations   ", back_fit_accelerations(window))
print("extrapolated @3s", predicted_velocities(window, 3.0))

# %%
# The newest entry carries zero acceleration, so the mean lags the true
# ramp value (4 m/s) by (4 - 3) / 3.
print("mean     ", predict_velocity(window, 3.0, "mean"))
print("last_fit ", predict_velocity(window, 3.0, "last_fit"))

# %%
# Constant velocity is reproduced exactly however far ahead we look.
flat = GoodSampleWindow(8, [(0.5, 0.05 * k) for k in range(8)])
for lead in (0.05, 0.5, 2.0):
    print(f"lead {lead:4} s -> {predict_velocity(flat, 0.35 + lead)} m/s")
