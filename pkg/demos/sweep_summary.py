"""
A small sweep
=============

Certify every slope with p, q <= 12 and look at the slopes as numbers.
"""
import sys

import numpy as np

from fig8rigidity.certify import certify_slopes, summarize, sweep_slopes, write_records

n = int(sys.argv[1]) if len(sys.argv) > 1 else 12
records = certify_slopes(sweep_slopes(n), jobs=2)
print(summarize(records))

ok = [r for r in records if r.b2]
mids = np.array([r.s_u.mid for r in ok])
widths = np.array([r.s_u.width for r in ok])
ratios = np.array([r.ratio for r in ok])

print("slopes certified:", len(ok), "of", len(records))
print("widest enclosure: %.3g" % widths.max())
print("median width: %.3g" % np.median(widths))

# how far the cusp slope sits from -q/p, relative to the enclosure width
gap = np.abs(mids - ratios) / widths
print("smallest gap / width: %.3g" % gap.min())

# sign of the slope against q/p
order = np.argsort(ratios)
for r in np.array(ok)[order][:5]:
    print(r.slope, "%+.6f" % r.ratio, r.s_u)

write_records(records[:5], sys.stdout)
