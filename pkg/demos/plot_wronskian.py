"""Write the Yukawa Wronskian on [0, 4] to a CSV and, if matplotlib is present, plot it.

Points where the series cannot be certified fall back to the Volterra
estimate and carry certified = 0.
"""

import csv
import sys

from zeroresonance.cli import cmd_plot_data

header, rows = cmd_plot_data("wronskian", 0.0, 4.0, 161)
path = sys.argv[1] if len(sys.argv) > 1 else "wronskian.csv"
with open(path, "w", newline="") as fh:
    w = csv.writer(fh)
    w.writerow(header)
    w.writerows(rows)
print("wrote", path, "with", len(rows), "rows;", sum(r[4] for r in rows), "certified")

try:
    import matplotlib.pyplot as plt
except ImportError:
    sys.exit(0)
k = [r[0] for r in rows]
plt.plot(k, [r[2] for r in rows])
plt.axhline(0, color="k", lw=0.5)
plt.xlabel("kappa")
plt.ylabel("W(kappa)")
plt.savefig(path.rsplit(".", 1)[0] + ".png", dpi=120)
