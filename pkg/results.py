"""Run records: CSV storage, atomic writes, resume bookkeeping."""

import csv
import logging
import os
import tempfile
from dataclasses import dataclass

from fitness import FitnessScore

log = logging.getLogger(__name__)

SEQUENCE_COLUMNS = [
    "N", "delta_theta", "f0", "sequence_length", "operation_duration",
    "angle_precision", "infidelity", "wall_time",
]
SUBSEQUENCE_COLUMNS = [
    "N", "delta_theta", "f0", "subsequence_length", "repetitions", "sequence_length",
    "operation_duration", "angle_precision", "infidelity", "wall_time",
]
EXTRA_COLUMNS = ["rng_seed", "genome", "satisfied"]


@dataclass
class RunRecord:
    index: int
    delta_theta: float
    f0: float
    sequence_length: int
    operation_duration: float
    angle_precision: float
    infidelity: float
    wall_time: float
    rng_seed: int
    genome: str
    satisfied: bool = False
    subsequence_length: int = None
    repetitions: int = None

    @property
    def mode(self):
        return "sequence" if self.subsequence_length is None else "subsequence"

    @property
    def score(self):
        return FitnessScore(self.angle_precision, self.infidelity)


def columns_for(mode):
    base = SUBSEQUENCE_COLUMNS if mode == "subsequence" else SEQUENCE_COLUMNS
    return base + EXTRA_COLUMNS


def _to_row(record):
    row = {
        "N": record.index,
        "delta_theta": repr(record.delta_theta),
        "f0": repr(record.f0),
        "sequence_length": record.sequence_length,
        "operation_duration": repr(record.operation_duration),
        "angle_precision": repr(record.angle_precision),
        "infidelity": repr(record.infidelity),
        "wall_time": repr(record.wall_time),
        "rng_seed": record.rng_seed,
        "genome": record.genome,
        "satisfied": int(record.satisfied),
    }
    if record.subsequence_length is not None:
        row["subsequence_length"] = record.subsequence_length
        row["repetitions"] = record.repetitions
    return row


def _from_row(row):
    sub = row.get("subsequence_length")
    return RunRecord(
        index=int(row["N"]),
        delta_theta=float(row["delta_theta"]),
        f0=float(row["f0"]),
        sequence_length=int(row["sequence_length"]),
        operation_duration=float(row["operation_duration"]),
        angle_precision=float(row["angle_precision"]),
        infidelity=float(row["infidelity"]),
        wall_time=float(row["wall_time"]),
        rng_seed=int(row["rng_seed"]),
        genome=row["genome"],
        satisfied=bool(int(row["satisfied"])),
        subsequence_length=int(sub) if sub not in (None, "") else None,
        repetitions=int(row["repetitions"]) if sub not in (None, "") else None,
    )


def write_records(path, records, mode="sequence"):
    """Write the CSV atomically: temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".results-", suffix=".csv", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=columns_for(mode), lineterminator="\n")
            writer.writeheader()
            for record in records:
                writer.writerow(_to_row(record))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    log.info("Wrote %d records to %s", len(records), path)


def read_records(path):
    with open(path, newline="") as f:
        return [_from_row(row) for row in csv.DictReader(f)]


def load_completed(path, mode):
    """Satisfying records of a previous run keyed by f0, for --resume."""
    if not os.path.exists(path):
        return {}
    done = {}
    for record in read_records(path):
        if record.satisfied and record.mode == mode:
            done[record.f0] = record
    return done


def write_sequence_files(records, out_dir):
    """seq_<N>.txt holding the genome in the '+', '-', '0' line format."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for record in records:
        path = os.path.join(out_dir, f"seq_{record.index}.txt")
        with open(path, "w") as f:
            f.write(record.genome + "\n")
        paths.append(path)
    return paths
