"""Exhaustive scan of small geometries under a homogeneous field.

Every connected sub-lattice of the six-site triangular template (sites and
bonds both vary) is driven with one left and two right reservoirs; none of
them rectifies: the graded field, not the geometry alone, is the necessary
ingredient.

The full scan of a few hundred geometries takes some minutes; this demo
caps the sub-lattice size at five sites to stay quick.  Use the CLI for
the full run:  spinrect scan-six-site --left 1 --right 2 --workers 2

Run:  python demos/05_six_site_scan.py
"""

from spinrect.cli import scan_six_site

report = scan_six_site(1, 2, h=1.0, deltas=(0.0, 0.5, 1.0), workers=2, max_sites=5)
print(f"scanned {report.n_geometries} geometries at deltas {list(report.deltas)}")
print(f"largest |R| found: {report.max_abs_r:.3e}")

by_sites: dict[int, int] = {}
for entry in report.entries:
    by_sites[entry.spec.n_sites] = by_sites.get(entry.spec.n_sites, 0) + 1
for n, count in sorted(by_sites.items()):
    print(f"  {n}-site sub-lattices: {count // len(report.deltas)} geometries")
