"""Convert an original BRISQUE LIBSVM release (allmodel + range files)
into the JSON model format used by the scorer.

Usage: python tools/convert_libsvm_model.py allmodel allrange out.json
"""

import json
import sys


def parse_range(path):
    lo, hi = [], []
    with open(path) as fh:
        lines = [l.strip() for l in fh if l.strip()]
    # first two lines: scaling target bounds; rest: index min max
    for line in lines[2:]:
        _, a, b = line.split()
        lo.append(float(a))
        hi.append(float(b))
    return lo, hi


def parse_model(path):
    gamma = rho = None
    sv, coeff = [], []
    with open(path) as fh:
        lines = fh.read().splitlines()
    body = False
    for line in lines:
        if body:
            parts = line.split()
            if not parts:
                continue
            coeff.append(float(parts[0]))
            vec = [0.0] * 36
            for item in parts[1:]:
                idx, val = item.split(":")
                vec[int(idx) - 1] = float(val)
            sv.append(vec)
        elif line.startswith("gamma"):
            gamma = float(line.split()[1])
        elif line.startswith("rho"):
            rho = float(line.split()[1])
        elif line.strip() == "SV":
            body = True
    return gamma, rho, sv, coeff


def main():
    allmodel, allrange, out = sys.argv[1:4]
    gamma, rho, sv, coeff = parse_model(allmodel)
    lo, hi = parse_range(allrange)
    doc = {
        "gamma": gamma,
        "rho": rho,
        "sv": sv,
        "coeff": coeff,
        "fmin": lo,
        "fmax": hi,
        "range": [0.0, 100.0],
        "provenance": f"converted from {allmodel}",
    }
    with open(out, "w") as fh:
        json.dump(doc, fh)
    print(f"{len(sv)} support vectors -> {out}")


if __name__ == "__main__":
    main()
