from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple

from constants.config_keys import (
    CONFIG_KEYS,
    LATTICE_KEYS,
    LATTICE_SIZE_KEYS,
    REQUIRED_KEYS,
)
from custom_types.backend import Backend
from custom_types.boa_config import BOAConfig
from custom_types.errors import ConfigError
from custom_types.integrator_range import IntegratorRange
from custom_types.lattice_type import LatticeType
from custom_types.lj_params import LJParams
from custom_types.log_level import LogLevel
from custom_types.run_config import LATTICE_BASIS_SIZES, RunConfig
from custom_types.run_mode import RunMode
from custom_types.snapshot_format import SnapshotFormat
from custom_types.thermostat_params import ThermostatParams
from utils.common_utils import CommonUtils
from utils.logging import Logging

KEY_KINDS = {key: kind for key, kind, _ in CONFIG_KEYS}
KEY_DEFAULTS = {key: default for key, _, default in CONFIG_KEYS}
ENUM_KEYS: Dict[str, Callable[[str], Any]] = {
    "mode": RunMode.from_value,
    "lattice": LatticeType.from_value,
    "backend": Backend.from_value,
    "output_format": SnapshotFormat.from_value,
}
TRUE_WORDS = ("true", "yes", "on", "1")
FALSE_WORDS = ("false", "no", "off", "0")


class ConfigUtils:
    def __init__(self, common_utils: CommonUtils, logging: Logging):
        self.common_utils = common_utils
        self.logging = logging

    def _error(self, message: str, line: Optional[int] = None) -> ConfigError:
        error = ConfigError(message, line)
        self.logging.log(str(error), LogLevel.ERROR)
        return error

    def _read_lines(self, text: str) -> Dict[str, Tuple[str, Optional[int]]]:
        raw: Dict[str, Tuple[str, Optional[int]]] = {}
        for number, line in enumerate(text.splitlines(), start=1):
            content = line.split("#", 1)[0].strip()
            if not content:
                continue
            key, sep, value = content.partition("=")
            key, value = key.strip(), value.strip()
            if not sep or not key:
                raise self._error(f"expected 'key = value', got '{content}'", number)
            if key not in KEY_KINDS:
                raise self._error(f"unknown key '{key}'", number)
            if key in raw:
                raise self._error(
                    f"duplicate key '{key}' (first set on line {raw[key][1]})", number
                )
            if not value:
                raise self._error(f"key '{key}' has no value", number)
            raw[key] = (value, number)
        return raw

    def _convert(self, key: str, value: str, line: Optional[int]) -> Any:
        kind = KEY_KINDS[key]
        try:
            match kind:
                case "int":
                    return int(value)
                case "float":
                    return float(value)
                case "bool":
                    lowered = value.lower()
                    if lowered in TRUE_WORDS:
                        return True
                    if lowered in FALSE_WORDS:
                        return False
                    raise ValueError(f"not a boolean: '{value}'")
                case "seed":
                    if value.lower() == "random":
                        return self.common_utils.draw_seed()
                    return int(value)
                case "path":
                    return Path(value)
                case "int_list":
                    return tuple(int(v) for v in value.split(",") if v.strip())
                case "float_list":
                    return tuple(float(v) for v in value.split(",") if v.strip())
                case "str_list":
                    return tuple(v.strip() for v in value.split(",") if v.strip())
                case _:
                    if key in ENUM_KEYS:
                        ENUM_KEYS[key](value)
                    return value
        except ValueError as e:
            raise self._error(f"malformed value for '{key}': {e}", line)

    def _validate(self, values: Dict[str, Any], lines: Dict[str, Optional[int]]) -> None:
        def require(key: str, ok: bool, condition: str) -> None:
            if values.get(key) is not None and not ok:
                raise self._error(
                    f"invalid value for '{key}': {values[key]!r}, expected {condition}",
                    lines.get(key),
                )

        for key in ("density", "mass", "epsilon", "sigma", "rc", "dt"):
            require(key, values.get(key) is None or values[key] > 0, "> 0")
        for key in ("temperature", "delta", "thermostat_temperature", "thermostat_frequency"):
            require(key, values[key] >= 0, ">= 0")
        for key in ("steps", "snapshot_interval", "boa_interval", "seed"):
            require(key, values[key] >= 0, ">= 0")
        for key in ("reuse", "workers", "sample_interval", "nu_nb_max", "nu_b_max", "bench_steps"):
            require(key, values[key] >= 1, ">= 1")
        for key in ("n_per_side", "npart"):
            require(key, values.get(key) is None or values[key] >= 1, ">= 1")
        for key in ("boa_rc", "cna_rc"):
            require(key, values.get(key) is None or values[key] > 0, "> 0")
        require("rc", values["rc"] > values["sigma"], "greater than sigma")
        require("boa_l", len(values["boa_l"]) > 0 and min(values["boa_l"]) >= 0, "degrees >= 0")
        require(
            "boa_l", len(set(values["boa_l"])) == len(values["boa_l"]), "distinct degrees"
        )
        box = values.get("box")
        require("box", box is None or (len(box) == 3 and min(box) > 0), "three extents > 0")
        for key in ("bench_sizes", "bench_workers"):
            require(key, len(values[key]) > 0 and min(values[key]) >= 1, "entries >= 1")
        for backend in values["bench_backends"]:
            try:
                Backend.from_value(backend)
            except ValueError as e:
                raise self._error(f"malformed value for 'bench_backends': {e}", lines.get("bench_backends"))

    def _lattice_size(self, values: Dict[str, Any], lines: Dict[str, Optional[int]]) -> Optional[int]:
        n_per_side, npart = values.get("n_per_side"), values.get("npart")
        if npart is None:
            return n_per_side
        basis = LATTICE_BASIS_SIZES[LatticeType.from_value(values["lattice"])]
        side = round((npart / basis) ** (1.0 / 3.0))
        if basis * side**3 != npart:
            raise self._error(
                f"npart = {npart} is not {basis} x n^3 for lattice '{values['lattice']}'",
                lines.get("npart"),
            )
        if n_per_side is not None and n_per_side != side:
            raise self._error(
                f"npart = {npart} contradicts n_per_side = {n_per_side}", lines.get("npart")
            )
        return side

    def parse_config(
        self,
        text: str,
        overrides: Optional[Mapping[str, str]] = None,
        debug: bool = False,
    ) -> RunConfig:
        raw = self._read_lines(text)
        for key, value in (overrides or {}).items():
            if key not in KEY_KINDS:
                raise self._error(f"unknown override key '{key}'")
            raw[key] = (str(value), None)
        missing = [key for key in REQUIRED_KEYS if key not in raw]
        if missing:
            raise self._error(f"missing required keys: {', '.join(missing)}")
        values: Dict[str, Any] = {}
        lines: Dict[str, Optional[int]] = {}
        for key, default in KEY_DEFAULTS.items():
            if key in raw:
                value, line = raw[key]
                values[key] = self._convert(key, value, line)
                lines[key] = line
            else:
                values[key] = None if default is None else self._convert(key, default, None)
        mode = RunMode.from_value(values["mode"])
        needs_lattice = mode is RunMode.BENCH or values["input"] is None
        if needs_lattice:
            missing = [key for key in LATTICE_KEYS if values.get(key) is None]
            if all(values.get(key) is None for key in LATTICE_SIZE_KEYS):
                missing.append(" or ".join(LATTICE_SIZE_KEYS))
            if missing:
                raise self._error(f"mode '{mode.value}' is missing keys: {', '.join(missing)}")
        self._validate(values, lines)
        n_per_side = self._lattice_size(values, lines)
        if values["thermostat"] and values["thermostat_frequency"] * values["dt"] > 1.0:
            raise self._error(
                "thermostat_frequency * dt must not exceed 1",
                lines.get("thermostat_frequency"),
            )
        config = RunConfig(
            mode=values["mode"],
            lattice=values["lattice"],
            backend=values["backend"],
            output_format=values["output_format"],
            bench_backends=values["bench_backends"],
            n_per_side=n_per_side,
            density=values["density"],
            temperature=values["temperature"],
            mass=values["mass"],
            epsilon=values["epsilon"],
            sigma=values["sigma"],
            rc=values["rc"],
            delta=values["delta"],
            dt=values["dt"],
            steps=values["steps"],
            reuse=values["reuse"],
            thermostat=values["thermostat"],
            thermostat_temperature=values["thermostat_temperature"],
            thermostat_frequency=values["thermostat_frequency"],
            workers=values["workers"],
            seed=values["seed"],
            force_kernel=values["force_kernel"],
            output_dir=values["output_dir"],
            sample_interval=values["sample_interval"],
            snapshot_interval=values["snapshot_interval"],
            boa_interval=values["boa_interval"],
            boa_l=values["boa_l"],
            boa_rc=values["boa_rc"],
            cna_rc=values["cna_rc"],
            nu_nb_max=values["nu_nb_max"],
            nu_b_max=values["nu_b_max"],
            input=values["input"],
            box=values["box"],
            bench_sizes=values["bench_sizes"],
            bench_workers=values["bench_workers"],
            bench_steps=values["bench_steps"],
        )
        if debug:
            self.logging.log(
                [f"{key}: {value!r}" for key, value in sorted(values.items())], LogLevel.DEBUG
            )
        return config

    def lj_params(self, config: RunConfig) -> LJParams:
        return LJParams(epsilon=config.epsilon, sigma=config.sigma, r_c=config.rc)

    def integrator_range(self, config: RunConfig, steps: Optional[int] = None) -> IntegratorRange:
        return IntegratorRange(
            n_max=config.steps if steps is None else steps,
            dt=config.dt,
            reuse_limit=config.reuse,
            delta=config.delta,
        )

    def thermostat_params(self, config: RunConfig) -> Optional[ThermostatParams]:
        if not config.thermostat:
            return None
        return ThermostatParams(
            target_temperature=config.thermostat_temperature,
            collision_frequency=config.thermostat_frequency,
            rng_seed=config.seed,
        )

    def boa_config(self, config: RunConfig, default_rc: float) -> BOAConfig:
        return BOAConfig(
            l_values=config.boa_l,
            r_c=config.boa_rc if config.boa_rc is not None else default_rc,
        )

    def overrides_from_flags(
        self,
        workers: Optional[int] = None,
        backend: Optional[str] = None,
        seed: Optional[str] = None,
        output_dir: Optional[str] = None,
    ) -> Dict[str, str]:
        overrides: Dict[str, str] = {}
        for key, value in (
            ("workers", workers),
            ("backend", backend),
            ("seed", seed),
            ("output_dir", output_dir),
        ):
            if value is not None:
                overrides[key] = str(value)
        return overrides

    def describe(self, config: RunConfig) -> List[str]:
        return [
            f"mode = {config.mode_enum.value}",
            f"lattice = {config.lattice_enum.value}",
            f"npart = {config.npart}",
            f"backend = {config.backend_enum.value}",
            f"workers = {config.workers}",
            f"seed = {config.seed}",
        ]
