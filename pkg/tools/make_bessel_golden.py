"""Regenerate src/ehnoma/data/bessel_golden.json with mpmath at 40 digits.

    python tools/make_bessel_golden.py

Orders 0..6, 40 log-spaced arguments on [1e-8, 700].
"""
import json
import pathlib

import mpmath
import numpy as np

mpmath.mp.dps = 40

ORDERS = range(7)
ARGS = np.logspace(-8, np.log10(700.0), 40)

OUT = pathlib.Path(__file__).resolve().parents[1] / "src" / "ehnoma" / "data" / "bessel_golden.json"


def main():
    rows = []
    for v in ORDERS:
        for z in ARGS:
            z = float(z)
            # the mpmath argument is the exact binary value of the double
            val = mpmath.besselk(v, mpmath.mpf(z))
            rows.append({"order": v, "z": z.hex(), "value": mpmath.nstr(val, 20, min_fixed=1, max_fixed=0)})
    OUT.write_text(json.dumps({"source": f"mpmath {mpmath.__version__}, dps=40", "rows": rows}, indent=1) + "\n")
    print(f"wrote {len(rows)} values to {OUT}")


if __name__ == "__main__":
    main()
