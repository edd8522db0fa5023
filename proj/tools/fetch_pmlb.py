#!/usr/bin/env python3
"""Export PMLB regression datasets to data/pmlb/<name>.csv.

Needs the `pmlb` package and network access. Names may omit PMLB's numeric
prefix ("vineyard" matches "192_vineyard").
"""
import argparse
import pathlib
import sys

DEFAULT_NAMES = [
    "vineyard", "analcatdata_apnea2", "ESL", "cloud", "machine_cpu",
    "pm10", "house_8L", "BNG_lowbwt", "SWD",
]


def resolve(name, known):
    if name in known:
        return name
    matches = [k for k in known if k.split("_", 1)[-1] == name]
    if len(matches) != 1:
        raise SystemExit(f"cannot resolve '{name}' to one PMLB dataset: {matches or 'no match'}")
    return matches[0]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("names", nargs="*", default=DEFAULT_NAMES)
    parser.add_argument("--out", type=pathlib.Path,
                        default=pathlib.Path(__file__).resolve().parent.parent / "data" / "pmlb")
    args = parser.parse_args()

    import pmlb

    args.out.mkdir(parents=True, exist_ok=True)
    for name in args.names:
        full = resolve(name, pmlb.regression_dataset_names)
        frame = pmlb.fetch_data(full)
        target = frame.pop("target")
        frame["target"] = target
        path = args.out / f"{name}.csv"
        frame.to_csv(path, index=False)
        print(f"{full}: {len(frame)} rows, {frame.shape[1] - 1} features -> {path}", file=sys.stderr)


if __name__ == "__main__":
    main()
