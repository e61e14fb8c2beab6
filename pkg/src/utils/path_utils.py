from pathlib import Path
from typing import Optional

from custom_types.kernel_source import KernelSource
from custom_types.log_level import LogLevel
from utils.logging import Logging


class PathUtils:
    def __init__(self, cwd: Path, logging: Logging):
        self.cwd: Path = cwd
        self.logging: Logging = logging

    def resolve(self, path: Path) -> Path:
        if path.is_absolute():
            return path
        return self.cwd.joinpath(path).resolve()

    def get_output_dir(self, output_dir: Path, debug: bool = False) -> Path:
        resolved = self.resolve(output_dir)
        try:
            resolved.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            error_msg = f"Unable to create output directory {str(resolved)}: {e}"
            self.logging.log(error_msg, LogLevel.CRITICAL)
            raise RuntimeError(error_msg)
        if debug:
            self.logging.log(f"Output dir: {str(resolved)}", LogLevel.DEBUG)
        return resolved

    def read_text(self, path: Path) -> str:
        resolved = self.resolve(path)
        if not resolved.is_file():
            error_msg = f"File not found: {str(resolved)}"
            self.logging.log(error_msg, LogLevel.ERROR)
            raise FileNotFoundError(error_msg)
        try:
            return resolved.read_text()
        except (OSError, UnicodeDecodeError) as e:
            error_msg = f"Error reading {str(resolved)}: {e}"
            self.logging.log(error_msg, LogLevel.ERROR)
            raise RuntimeError(error_msg)

    def read_kernel_source(
        self, path: Path, name: Optional[str] = None, debug: bool = False
    ) -> KernelSource:
        code = self.read_text(path)
        source = KernelSource(name=name or path.stem, code=code)
        if debug:
            self.logging.log(
                [f"Kernel file: {str(path)}", f"Kernel name: {source.name}"],
                LogLevel.DEBUG,
            )
        return source
