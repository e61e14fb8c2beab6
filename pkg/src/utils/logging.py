from logging import DEBUG, basicConfig, getLogger
from logging import log as _log
from inspect import stack
from pathlib import Path
from typing import List, Optional

from custom_types.log_level import LogLevel

LOG_FILE_NAME = "pairgenie.log"
LOG_FORMAT = "[%(asctime)s - %(name)s - %(levelname)s] - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"
OWN_MODULES = ("utils.", "base", "simulate_commands", "analysis_commands", "bench_commands")


class Logging:
    def __init__(self, log_dir: Optional[Path] = None, level: LogLevel = LogLevel.DEBUG):
        self.level = level
        self.log_file_path: Optional[Path] = None
        self.last_call_stack: Optional[str] = None
        self.use_log_dir(log_dir)

    def use_log_dir(self, log_dir: Optional[Path]) -> None:
        """Sends records to log_dir/pairgenie.log, or to stderr when None."""
        if log_dir is not None:
            log_dir.mkdir(parents=True, exist_ok=True)
            self.log_file_path = log_dir.joinpath(LOG_FILE_NAME)
            basicConfig(
                filename=self.log_file_path,
                level=self.level_to_int(self.level),
                format=LOG_FORMAT,
                datefmt=DATE_FORMAT,
                force=True,
            )
        else:
            self.log_file_path = None
            basicConfig(
                level=self.level_to_int(self.level),
                format=LOG_FORMAT,
                datefmt=DATE_FORMAT,
            )
        self.last_call_stack = None

    @staticmethod
    def level_to_int(level: LogLevel) -> int:
        match level:
            case LogLevel.INFO:
                return 20
            case LogLevel.CRITICAL:
                return 50
            case LogLevel.ERROR:
                return 40
            case LogLevel.WARN:
                return 30
            case _:
                return DEBUG

    @staticmethod
    def get_caller_params():
        call_stack = stack(context=0)
        caller_frame = call_stack[2].frame
        return caller_frame.f_locals

    def build_call_stack(self) -> str:
        call_stack: list[str] = []
        for s in stack(context=0)[1:]:
            owner = s.frame.f_locals.get("self")
            module = s.frame.f_globals.get("__name__", "")
            if owner is None or not module.startswith(OWN_MODULES):
                continue
            class_name = owner.__class__.__name__
            method_name = s.frame.f_code.co_name
            if class_name == "Logging":
                continue
            call_stack.append(method_name)
            call_stack.append(class_name)
        return ":".join(reversed(call_stack))

    def reset_log_file(self) -> None:
        if (
            self.log_file_path is not None
            and self.log_file_path.exists()
            and self.log_file_path.is_file()
        ):
            self.log_file_path.write_text("")
        self.last_call_stack = None

    def log(
        self,
        msg: str | List[str],
        level: LogLevel,
    ) -> None:
        level_int = self.level_to_int(level)
        if not getLogger().isEnabledFor(level_int):
            return
        if isinstance(msg, list):
            msg = "\n".join(str(m) for m in msg)
        log_msg = ""
        call_stack = self.build_call_stack()
        if call_stack != self.last_call_stack:
            log_msg += f"[{call_stack}]:\nParams:\n"
            params = self.get_caller_params()
            if params is not None:
                for k, v in params.items():
                    if k == "self":
                        continue
                    log_msg += f"{k}: {v!r:.200}\n"
                log_msg += "\n"
        log_msg += msg
        _log(level_int, log_msg)
        self.last_call_stack = call_stack

    def echo(self, msg: str) -> None:
        print(msg, flush=True)
