"""
Plot critical network size against neighbourhood bound

Reads the ``critical_n.csv`` written by ``consensus-lab critical-n`` and draws one
line per order ``n``. Usage::

    consensus-lab critical-n --family path_fuzz --qs 2,4,6,8,10,12 --ns 3,4,5 \
        --n 5 --a 0.1,0.8,1,1,1 --Nmax 400 --jobs 4 --out fig
    python scripts/plot_critical_n.py fig/critical_n.csv critical-n.png
"""
import sys

import matplotlib.pyplot as plt
import pandas as pd

plt.style.use("ggplot")
plt.rcParams["figure.figsize"] = 8, 5
plt.rcParams["font.family"] = "serif"
plt.rcParams["font.size"] = 12

input_path, output_path = sys.argv[1], sys.argv[2]

summary = pd.read_csv(input_path, na_values=["none"])
for n, df in summary.groupby("n"):
    plt.plot(df["q"], df["critical_N"], marker="o", label="n = {}".format(n))

plt.xlabel("neighbourhood bound q")
plt.ylabel("critical network size")
plt.legend()

plt.savefig(output_path, dpi=96)
