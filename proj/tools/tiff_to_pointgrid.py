#!/usr/bin/env python3
# Copyright (c) 2026, the mvfsad authors
# SPDX-License-Identifier: Apache-2.0
"""Convert organized XYZ TIFF point clouds (H x W x 3 float) to .pgrd files.

The .pgrd layout read by mvfsad:
    b"PGRD", uint32 LE height, uint32 LE width, then H*W*3 float32 LE (x, y, z)
Points with z == 0 or any non-finite coordinate are treated as missing.

Usage:
    tiff_to_pointgrid.py INPUT.tiff OUTPUT.pgrd
    tiff_to_pointgrid.py --tree SRC_ROOT DST_ROOT

--tree mirrors a MVTec-3D style layout (<class>/<split>/<defect>/{rgb,xyz,gt})
into the mvfsad dataset layout, converting xyz/*.tiff and copying rgb/ and gt/
PNGs unchanged.
"""

import argparse
import pathlib
import shutil
import struct
import sys

import cv2
import numpy as np


def read_xyz(path):
    data = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if data is None:
        raise SystemExit(f"{path}: cannot read TIFF")
    if data.ndim != 3 or data.shape[2] != 3:
        raise SystemExit(f"{path}: expected an H x W x 3 image, got shape {data.shape}")
    # OpenCV returns channels in BGR order.
    return np.ascontiguousarray(data[:, :, ::-1], dtype=np.float32)


def write_pgrd(path, xyz):
    h, w, _ = xyz.shape
    xyz = np.where(np.isfinite(xyz), xyz, 0.0).astype("<f4")
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(b"PGRD")
        f.write(struct.pack("<II", h, w))
        f.write(xyz.tobytes())


def convert_tree(src, dst):
    count = 0
    for tiff in sorted(src.glob("*/*/*/xyz/*.tiff")):
        rel = tiff.relative_to(src)
        sample_dir = dst / rel.parent.parent
        write_pgrd(sample_dir / "xyz" / (tiff.stem + ".pgrd"), read_xyz(tiff))
        for sub in ("rgb", "gt"):
            png = tiff.parent.parent / sub / (tiff.stem + ".png")
            if png.exists():
                (sample_dir / sub).mkdir(parents=True, exist_ok=True)
                shutil.copyfile(png, sample_dir / sub / png.name)
        count += 1
    print(f"converted {count} samples", file=sys.stderr)


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--tree", action="store_true", help="convert a whole dataset tree")
    parser.add_argument("src", type=pathlib.Path)
    parser.add_argument("dst", type=pathlib.Path)
    args = parser.parse_args()
    if args.tree:
        convert_tree(args.src, args.dst)
    else:
        write_pgrd(args.dst, read_xyz(args.src))


if __name__ == "__main__":
    main()
