#!/usr/bin/env python3
"""Fetch the UCI airfoil self-noise table and report its SHA-256.

Run from a machine with network access:

    python scripts/fetch_airfoil.py [dest]

The default destination is $BOCVS_DATA_DIR/airfoil_self_noise.dat (falling
back to ./data).  When ``bocvs.benchmarks.AIRFOIL_SHA256`` is set, the
download is verified against it; otherwise the computed digest is printed so
it can be pinned there.
"""

import sys

from bocvs.benchmarks import AIRFOIL_SHA256, airfoil_data_path, fetch_airfoil

def main() -> int:
    dest = sys.argv[1] if len(sys.argv) > 1 else airfoil_data_path()
    digest = fetch_airfoil(dest)
    print(f"wrote {dest}")
    print(f"sha256 {digest}")
    if AIRFOIL_SHA256 is None:
        print("pin this digest as bocvs.benchmarks.AIRFOIL_SHA256")
    return 0


if __name__ == "__main__":
    sys.exit(main())
