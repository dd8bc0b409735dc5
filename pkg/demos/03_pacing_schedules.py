"""
Pacing schedules and hours-seen accounting
==========================================

A pacing schedule starts training on a small sampled subset and grows it
geometrically, refreshing the sample every M epochs and always finishing on
the full set. Training on fewer hours is the whole point: this prints the
schedule and the cumulative hours seen, paced vs unpaced.
"""

from curricula import PacingParams, build_schedule, hours_seen, pacing_fraction
from curricula.pacing import DISABLED_PACING

EPOCHS = 15
FULL_HOURS = 1382.0  # a realistically sized training set

params = PacingParams(start_fraction=0.2, growth_factor=1.71, growth_step=5.0,
                      refresh_every=1)
schedule = build_schedule(EPOCHS, params)

print("epoch  fraction  refresh  hours this epoch")
for entry in schedule.entries:
    print(f"{entry.epoch:5d}  {entry.fraction:8.4f}  {str(entry.refresh):7s}"
          f"  {entry.fraction * FULL_HOURS:10.1f}")

paced = hours_seen(schedule, FULL_HOURS)
unpaced = hours_seen(build_schedule(EPOCHS, DISABLED_PACING), FULL_HOURS)
print()
print(f"paced hours seen   : {paced / 1000:.2f}K")
print(f"unpaced hours seen : {unpaced / 1000:.2f}K")
print(f"ratio              : {paced / unpaced:.3f} "
      "(roughly half the compute for the full epoch budget)")

# A sparser refresh interval reuses each sampled subset for M epochs.
print()
sparse = build_schedule(10, PacingParams(refresh_every=3))
print("refresh epochs with M=3 over 10 epochs:", sparse.refresh_epochs)
print("fractions:", [round(e.fraction, 3) for e in sparse.entries])

# The raw fraction curve, before clamping at 1.0.
print()
print("fraction formula, min(1, 0.2 * 1.71^(i/5)):")
print(" ", [round(pacing_fraction(i, params), 3) for i in range(1, EPOCHS + 1)])
