import csv
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from constants.dat_names import VELOCITY
from custom_types.dat_type import DatType
from custom_types.log_level import LogLevel
from custom_types.observables import Observables
from custom_types.snapshot import Snapshot
from custom_types.snapshot_format import SnapshotFormat
from custom_types.state import State
from utils.common_utils import CommonUtils
from utils.logging import Logging
from utils.state_utils import StateUtils

POSITION_COLUMNS = ("x", "y", "z")
VELOCITY_COLUMNS = ("vx", "vy", "vz")
THERMO_COLUMNS = (
    "step",
    "time",
    "kinetic",
    "potential",
    "total",
    "temperature",
    "px",
    "py",
    "pz",
    "rebuilds",
)


class SnapshotUtils:
    def __init__(self, common_utils: CommonUtils, state_utils: StateUtils, logging: Logging):
        self.common_utils = common_utils
        self.state_utils = state_utils
        self.logging = logging

    def _format(self, value: Any) -> str:
        if value is None:
            return ""
        if isinstance(value, (bool, np.bool_)):
            return str(int(value))
        if isinstance(value, (int, np.integer)):
            return str(int(value))
        if isinstance(value, (float, np.floating)):
            return self.common_utils.format_float(float(value))
        return str(value)

    def _extra_columns(self, snapshot: Snapshot) -> List[Tuple[str, np.ndarray]]:
        flat: List[Tuple[str, np.ndarray]] = []
        for name, column in snapshot.columns.items():
            column = np.asarray(column)
            if column.ndim == 1:
                flat.append((name, column))
            else:
                flat.extend((f"{name}_{k}", column[:, k]) for k in range(column.shape[1]))
        return flat

    def _xyz_lines(self, snapshot: Snapshot) -> Iterator[str]:
        fmt = self.common_utils.format_float
        box = ",".join(fmt(e) for e in snapshot.extents)
        yield str(snapshot.npart)
        yield f"step={snapshot.step} time={fmt(snapshot.time)} box={box}"
        for pid, position in zip(snapshot.ids, snapshot.positions):
            yield " ".join([str(int(pid))] + [fmt(float(x)) for x in position])

    def _open_error(self, path: Path, e: Exception) -> RuntimeError:
        error_msg = f"Unable to write {str(path)}: {e}"
        self.logging.log(error_msg, LogLevel.ERROR)
        return RuntimeError(error_msg)

    def write_snapshot(
        self,
        snapshot: Snapshot,
        path: Path,
        fmt: SnapshotFormat = SnapshotFormat.XYZ,
        debug: bool = False,
    ) -> Path:
        try:
            match fmt:
                case SnapshotFormat.XYZ:
                    path.write_text("\n".join(self._xyz_lines(snapshot)) + "\n")
                case SnapshotFormat.CSV:
                    extra = self._extra_columns(snapshot)
                    header = ["id", *POSITION_COLUMNS]
                    if snapshot.velocities is not None:
                        header.extend(VELOCITY_COLUMNS)
                    header.extend(name for name, _ in extra)
                    with path.open("w", newline="") as handle:
                        writer = csv.writer(handle)
                        writer.writerow(header)
                        for i in range(snapshot.npart):
                            row = [snapshot.ids[i], *snapshot.positions[i]]
                            if snapshot.velocities is not None:
                                row.extend(snapshot.velocities[i])
                            row.extend(column[i] for _, column in extra)
                            writer.writerow([self._format(v) for v in row])
        except OSError as e:
            raise self._open_error(path, e)
        if debug:
            self.logging.log(
                [f"Wrote {fmt.value} snapshot: {str(path)}", f"Step: {snapshot.step}", f"Particles: {snapshot.npart}"],
                LogLevel.DEBUG,
            )
        return path

    def append_frame(self, snapshot: Snapshot, path: Path) -> None:
        """Appends one XYZ frame to a trajectory file."""
        try:
            with path.open("a") as handle:
                handle.write("\n".join(self._xyz_lines(snapshot)) + "\n")
        except OSError as e:
            raise self._open_error(path, e)

    def _read_error(self, path: Path, detail: str) -> ValueError:
        error_msg = f"Malformed snapshot {str(path)}: {detail}"
        self.logging.log(error_msg, LogLevel.ERROR)
        return ValueError(error_msg)

    def _read_xyz(self, path: Path, lines: List[str]) -> Snapshot:
        if len(lines) < 2:
            raise self._read_error(path, "missing header lines")
        try:
            npart = int(lines[0])
            fields = dict(token.split("=", 1) for token in lines[1].split())
            step = int(fields["step"])
            time = float(fields["time"])
            extents = tuple(float(e) for e in fields["box"].split(","))
        except (ValueError, KeyError) as e:
            raise self._read_error(path, f"bad header ({e})")
        rows = [line.split() for line in lines[2 : 2 + npart]]
        if len(rows) != npart or any(len(row) != 4 for row in rows):
            raise self._read_error(path, f"expected {npart} rows of 'id x y z'")
        try:
            ids = np.array([int(row[0]) for row in rows], dtype=np.int64)
            positions = np.array([[float(x) for x in row[1:]] for row in rows], dtype=np.float64)
        except ValueError as e:
            raise self._read_error(path, str(e))
        return Snapshot(
            step=step,
            time=time,
            extents=extents,
            ids=ids,
            positions=positions.reshape(npart, 3),
        )

    def _read_csv(self, path: Path, text: str, extents: Optional[Sequence[float]]) -> Snapshot:
        if extents is None:
            raise self._read_error(path, "CSV snapshots carry no box, extents are required")
        reader = csv.DictReader(text.splitlines())
        header = reader.fieldnames or []
        missing = [c for c in ("id", *POSITION_COLUMNS) if c not in header]
        if missing:
            raise self._read_error(path, f"missing columns {missing}")
        records = list(reader)
        has_velocities = all(c in header for c in VELOCITY_COLUMNS)
        known = {"id", *POSITION_COLUMNS, *(VELOCITY_COLUMNS if has_velocities else ())}
        try:
            ids = np.array([int(r["id"]) for r in records], dtype=np.int64)
            positions = np.array(
                [[float(r[c]) for c in POSITION_COLUMNS] for r in records], dtype=np.float64
            ).reshape(len(records), 3)
            velocities = (
                np.array(
                    [[float(r[c]) for c in VELOCITY_COLUMNS] for r in records], dtype=np.float64
                ).reshape(len(records), 3)
                if has_velocities
                else None
            )
        except (ValueError, TypeError) as e:
            raise self._read_error(path, str(e))
        columns: Dict[str, np.ndarray] = {}
        for name in header:
            if name in known:
                continue
            raw = [r[name] for r in records]
            try:
                columns[name] = np.array([float(v) for v in raw], dtype=np.float64)
            except ValueError:
                columns[name] = np.array(raw, dtype=object)
        return Snapshot(
            step=0,
            time=0.0,
            extents=tuple(float(e) for e in extents),
            ids=ids,
            positions=positions,
            velocities=velocities,
            columns=columns,
        )

    def read_snapshot(
        self,
        path: Path,
        extents: Optional[Sequence[float]] = None,
        debug: bool = False,
    ) -> Snapshot:
        if not path.is_file():
            error_msg = f"Snapshot not found: {str(path)}"
            self.logging.log(error_msg, LogLevel.ERROR)
            raise FileNotFoundError(error_msg)
        text = path.read_text()
        try:
            fmt = SnapshotFormat.from_value(path.suffix.lstrip(".").lower())
        except ValueError:
            raise self._read_error(path, f"unknown extension '{path.suffix}'")
        match fmt:
            case SnapshotFormat.XYZ:
                snapshot = self._read_xyz(path, text.splitlines())
                if extents is not None:
                    snapshot.extents = tuple(float(e) for e in extents)
            case SnapshotFormat.CSV:
                snapshot = self._read_csv(path, text, extents)
        if debug:
            self.logging.log(
                [f"Read {fmt.value} snapshot: {str(path)}", f"Particles: {snapshot.npart}", f"Box: {snapshot.extents}"],
                LogLevel.DEBUG,
            )
        return snapshot

    def snapshot_from_state(
        self,
        state: State,
        step: int = 0,
        time: float = 0.0,
        columns: Optional[Dict[str, np.ndarray]] = None,
        with_velocities: bool = True,
    ) -> Snapshot:
        velocities = None
        if with_velocities and VELOCITY in state:
            velocities = state[VELOCITY].values.copy()
        return Snapshot(
            step=step,
            time=time,
            extents=state.domain.extents,
            ids=state.global_ids.values[:, 0].copy(),
            positions=state.positions.values.copy(),
            velocities=velocities,
            columns=dict(columns or {}),
        )

    def state_from_snapshot(self, snapshot: Snapshot, debug: bool = False) -> State:
        state = self.state_utils.create_state(
            snapshot.npart, snapshot.extents, snapshot.positions, debug=debug
        )
        state.global_ids.values[:, 0] = snapshot.ids
        if snapshot.velocities is not None:
            velocities = self.state_utils.ensure_dat(state, VELOCITY, 3, DatType.FLOAT64)
            velocities.values[:] = snapshot.velocities
        return state

    def thermo_header(self, l_values: Sequence[int]) -> List[str]:
        return [*THERMO_COLUMNS, *(f"Q_{l}" for l in l_values)]

    def thermo_row(self, observables: Observables, l_values: Sequence[int]) -> List[str]:
        px, py, pz = observables.momentum
        values = [
            observables.step,
            observables.time,
            observables.kinetic,
            observables.potential,
            observables.total,
            observables.temperature,
            px,
            py,
            pz,
            observables.rebuilds,
            *(observables.q_means.get(l) for l in l_values),
        ]
        return [self._format(v) for v in values]

    def write_observables(
        self,
        observables: Iterable[Observables],
        path: Path,
        l_values: Sequence[int] = (),
    ) -> List[Observables]:
        """Streams observables into a CSV as they are produced."""
        written: List[Observables] = []
        try:
            with path.open("w", newline="") as handle:
                writer = csv.writer(handle)
                writer.writerow(self.thermo_header(l_values))
                for entry in observables:
                    writer.writerow(self.thermo_row(entry, l_values))
                    handle.flush()
                    written.append(entry)
        except OSError as e:
            raise self._open_error(path, e)
        return written

    def write_table(self, path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        try:
            with path.open("w", newline="") as handle:
                writer = csv.writer(handle)
                writer.writerow(header)
                writer.writerows([self._format(v) for v in row] for row in rows)
        except OSError as e:
            raise self._open_error(path, e)
        return path
