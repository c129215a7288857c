"""CSV/JSON serialization of trajectories and gnuplot script emission."""
import csv
import json
import logging
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from ovenctl.services.design import ClosedLoop
from ovenctl.services.simulation import Trajectory

logger = logging.getLogger(__name__)

NUMBER_FORMAT = ".9g"
PathLike = Union[str, Path]


class TrajectoryWriter:
    """
    Writes trajectories in the fixed column layout::

        open loop:   t,T_air,T_wall,T_food,u
        closed loop: t,T_air,T_wall,T_food,T_air_hat,T_wall_hat,T_food_hat,u

    Hats are the plant state minus the estimation error; ``u`` is the drive
    actually applied to the plant.
    """

    def __init__(self, out_dir: Optional[PathLike] = None):
        self.out_dir = Path(out_dir) if out_dir else None

    def resolve(self, path: PathLike) -> Path:
        """Relative paths land in ``out_dir`` when one is configured."""
        path = Path(path)
        if self.out_dir is not None and not path.is_absolute():
            path = self.out_dir / path
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    @staticmethod
    def tabulate(traj: Trajectory, loop: Optional[ClosedLoop] = None) -> tuple[list[str], np.ndarray]:
        """Column labels and the sample-by-column matrix."""
        if loop is None:
            labels = ["t", *traj.labels, "u"]
            data = np.column_stack([traj.times, traj.states, traj.input])
            return labels, data

        n = loop.plant.order
        plant_states = traj.states[:, :n]
        estimates = plant_states - traj.states[:, n:]
        applied = loop.plant_input(traj.states, traj.input)
        plant_labels = list(loop.plant.state_labels)
        labels = ["t", *plant_labels, *(f"{label}_hat" for label in plant_labels), "u"]
        data = np.column_stack([traj.times, plant_states, estimates, applied])
        return labels, data

    @staticmethod
    def format_number(value: float) -> str:
        return format(float(value), NUMBER_FORMAT)

    def write_csv(self, path: PathLike, traj: Trajectory, loop: Optional[ClosedLoop] = None) -> Path:
        path = self.resolve(path)
        labels, data = self.tabulate(traj, loop)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(labels)
            for row in data:
                writer.writerow([self.format_number(v) for v in row])
        logger.info("Wrote %d samples to %s", len(data), path)
        return path

    def write_json(self, path: PathLike, traj: Trajectory, loop: Optional[ClosedLoop] = None,
                   meta: Optional[dict[str, Any]] = None) -> Path:
        path = self.resolve(path)
        labels, data = self.tabulate(traj, loop)
        payload = {
            "labels": labels,
            "columns": {
                label: [float(self.format_number(v)) for v in data[:, i]] for i, label in enumerate(labels)
            },
            "meta": meta or {},
        }
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=1)
            f.write("\n")
        logger.info("Wrote %d samples to %s", len(data), path)
        return path

    def write(self, path: PathLike, traj: Trajectory, loop: Optional[ClosedLoop] = None,
              fmt: str = "csv", meta: Optional[dict[str, Any]] = None) -> Path:
        if fmt == "json":
            return self.write_json(path, traj, loop, meta)
        return self.write_csv(path, traj, loop)

    def write_plot_script(self, data_path: PathLike, labels: list[str], title: str) -> Path:
        """
        gnuplot script plotting every temperature column of a CSV against ``t``.

        Written next to the data file as ``<data>.gp``.
        """
        data_path = Path(data_path)
        script_path = data_path.with_suffix(data_path.suffix + ".gp")
        lines = [
            "set datafile separator ','",
            f"set title '{title}'",
            "set xlabel 'time'",
            "set ylabel 'temperature (F)'",
            "set key autotitle columnhead",
            "set grid",
        ]
        columns = [i for i, label in enumerate(labels, start=1) if label.startswith("T_")]
        plots = ", ".join(f"'{data_path.name}' using 1:{col} with lines" for col in columns)
        lines.append(f"plot {plots}")
        with open(script_path, "w", encoding="utf-8") as f:
            f.write("\n".join(lines) + "\n")
        return script_path


def read_csv(path: PathLike) -> tuple[list[str], np.ndarray]:
    """Parse a trajectory CSV back into labels and a float matrix."""
    with open(path, "r", newline="", encoding="utf-8") as f:
        rows = list(csv.reader(f))
    if not rows:
        raise ValueError(f"{path} is empty")
    labels, body = rows[0], rows[1:]
    return labels, np.array([[float(v) for v in row] for row in body], dtype=float)
