"""Small delay-exponent sweep through the library API, printed as a table.

Same layout as the CSVs written by ``noma-er-sweep --axis theta`` but only
for the two-user single-antenna scenario and instantaneous CSI on both links.
"""
import tempfile

from noma_er.sweep import run_sweep, validate_config


def main():
    with tempfile.TemporaryDirectory() as out:
        spec = validate_config({
            "axis": "theta",
            "theta_grid": [0.01, 0.1, 1.0, 10.0, 100.0],
            "scenarios": [{"K": 2, "N": 1, "distances": [10.0, 50.0]}],
            "cases": ["II", "SS"],
            "out": out,
        })
        for path in run_sweep(spec):
            print(f"# {path.name}")
            print(path.read_text())


if __name__ == "__main__":
    main()
