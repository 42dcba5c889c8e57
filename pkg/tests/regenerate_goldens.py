"""Regenerate the committed golden PGM files from the bundled fixtures.

    python3 tests/regenerate_goldens.py

Run only after an intentional change to rasterization or PGM output, and
review the diff of tests/golden/ before committing.
"""
import shutil
import tempfile
from pathlib import Path

from kernelconv.cli import main

GOLDEN_DIR = Path(__file__).resolve().parent / "golden"

# (command, bundled config, artifact produced by the command)
GOLDENS = [
    ("kernel", "pacman.json", "kernel.pgm"),
    ("converge", "drunken.json", "residue_1.pgm"),
    ("converge", "drunken.json", "residue_2.pgm"),
    ("kernel", "drunken.json", "kernel.pgm"),
    ("kernel", "increasing_discs.json", "kernel.pgm"),
    ("psi-kernel", "sj_profile.json", "psi_kernel.pgm"),
    ("psi", "sj_profile.json", "psi.pgm"),
    ("psi-kernel", "graph.json", "psi_kernel.pgm"),
]


def golden_name(command, config, artifact):
    return f"{Path(config).stem}__{command}__{artifact}"


def regenerate(target=GOLDEN_DIR):
    target.mkdir(exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        for command, config, artifact in GOLDENS:
            out = Path(tmp) / f"{command}-{config}"
            if not out.exists():
                main([command, config, "--out", str(out)])
            shutil.copyfile(out / artifact, target / golden_name(command, config, artifact))


if __name__ == "__main__":
    regenerate()
    print(f"wrote {len(GOLDENS)} golden files to {GOLDEN_DIR}")
