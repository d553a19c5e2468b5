"""
A run is one command of the CLI: it resolves its configuration, computes,
and writes its outputs into an output directory together with a manifest.

Outputs are first written into a staging directory created inside the
output directory and moved into place only when the run succeeds, so a
failed run leaves no partial files behind. The manifest is written last.
"""
import datetime
import logging
import shutil
import sys
import tempfile
from abc import ABC, abstractmethod
from functools import wraps
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import yaml
from ml_collections import config_dict
from pythonjsonlogger import jsonlogger

from nonstatic_phase import __version__
from nonstatic_phase.exceptions import ConfigError
from nonstatic_phase.params import load_config
from nonstatic_phase.utils import conf
from nonstatic_phase.utils.utils import sha256_digest, to_jsonable, write_csv, write_json

MANIFEST_FILE = "manifest.json"
CONFIG_FILE = "config.yaml"
LOG_FILE = "run.log.jsonl"
LOG_FORMAT = "%(asctime)s %(name)s %(levelname)s %(message)s"


class Run(ABC):
    """
    Abstract class for a command run.

    Parameters
    ----------
    config_path : str or Path, optional
        A ``key = value`` wave configuration file.
    out_dir : str or Path
        Directory receiving the outputs and the manifest.
    argv : sequence of str, optional
        Command line recorded in the manifest.
    verbose : bool
        Log at INFO (True) or WARNING level.
    overrides : dict, optional
        ``--set`` values. Plain keys address the wave configuration,
        dotted keys any section of the run configuration.

    Usage:
    -------
    class MyRun(Run):
        def options(self):
            return {"n_steps": 10}

        def run(self):
            df = ...
            self.write_frame(df, "out.csv")

    >>> MyRun(out_dir="outputs").run()
    """

    def __init__(
        self,
        config_path: Union[str, Path, None] = None,
        out_dir: Union[str, Path] = "outputs",
        argv: Optional[Sequence[str]] = None,
        verbose: bool = True,
        overrides: Optional[Dict[str, Any]] = None,
    ):
        self.config_path = config_path
        self.out_dir = Path(out_dir)
        self.argv = list(sys.argv if argv is None else argv)
        self.overrides = dict(overrides or {})
        self.outputs: List[str] = []
        self.staging: Optional[Path] = None
        self._log_handler: Optional[logging.Handler] = None
        self._created_out_dir = False
        # change the run function to the one that allows for pre- and post-run hooks
        self.run = self.wrap_run()
        self.logger = logging.getLogger(self.__class__.__name__)
        self.logger.setLevel(logging.INFO if verbose else logging.WARNING)
        self.verbose = verbose
        self.config = None

    @property
    def run_name(self) -> str:
        return self.__class__.__name__

    def options(self) -> Dict[str, Any]:
        """
        Command options stored next to the wave configuration.
        """
        return {}

    def wave_values(self) -> Dict[str, Any]:
        """
        Wave configuration before overrides (config file or defaults).
        """
        return load_config(self.config_path).to_dict()

    def get_config(self) -> config_dict.ConfigDict:
        """
        Resolve the run configuration: defaults < config file < overrides.
        """
        config_ = config_dict.ConfigDict({"wave": self.wave_values(), **self.options()})
        config_.wave.lock()
        for key, value in self.overrides.items():
            param = key if "." in key or key in config_ else f"wave.{key}"
            try:
                conf.set_conf_param(config_, param, value)
            except (KeyError, AttributeError, TypeError) as e:
                raise ConfigError(f"cannot set {key}={value!r}: {e}") from e
        return config_

    @abstractmethod
    def run(self):
        """
        Run the command and write its outputs with `write_*`.
        """
        raise NotImplementedError("The run method must be implemented.")

    # --- outputs -----------------------------------------------------------------------

    def output_path(self, name: str) -> Path:
        """
        Staging path of an output file; the file is listed in the manifest.
        """
        if self.staging is None:
            raise RuntimeError("outputs can only be written while the run is active")
        if name in self.outputs:
            raise ValueError(f"output {name} written twice")
        self.outputs.append(name)
        return self.staging / name

    def write_frame(self, df, name: str) -> Path:
        return write_csv(df, self.output_path(name))

    def write_json(self, obj: Any, name: str) -> Path:
        return write_json(obj, self.output_path(name))

    # --- lifecycle ---------------------------------------------------------------------

    def pre_run(self):
        """
        Called before the run: creates the staging directory and starts the
        JSON log inside it.
        """
        if not self.out_dir.exists():
            self.out_dir.mkdir(parents=True)
            self._created_out_dir = True
        self.staging = Path(tempfile.mkdtemp(prefix=".staging-", dir=self.out_dir))
        handler = logging.FileHandler(self.staging / LOG_FILE, encoding="utf-8")
        handler.setFormatter(jsonlogger.JsonFormatter(LOG_FORMAT))
        handler.setLevel(logging.INFO if self.verbose else logging.WARNING)
        logging.getLogger().addHandler(handler)
        self._log_handler = handler
        self.logger.info(f'Running "{self.run_name}" into {self.out_dir}')
        with open(self.staging / CONFIG_FILE, "w", encoding="utf-8") as f:
            yaml.safe_dump(to_jsonable(self.config.to_dict()), f, default_flow_style=False, sort_keys=True)

    def post_run(self, result=None):
        """
        Called after a successful run: writes the manifest and moves the
        staged files into the output directory, manifest last.
        """
        self.logger.info(f'Finished "{self.run_name}": {len(self.outputs)} output file(s)')
        self._close_log()
        manifest = self.manifest()
        write_json(manifest, self.staging / MANIFEST_FILE)
        for name in self.outputs + [CONFIG_FILE, LOG_FILE, MANIFEST_FILE]:
            target = self.out_dir / name
            target.parent.mkdir(parents=True, exist_ok=True)
            shutil.move(str(self.staging / name), str(target))
        shutil.rmtree(self.staging, ignore_errors=True)
        self.staging = None

    def on_error(self, error: BaseException):
        """
        Called when the run fails: drops the staged files.
        """
        self.logger.error(f'"{self.run_name}" failed: {error}')
        self._close_log()
        if self.staging is not None:
            shutil.rmtree(self.staging, ignore_errors=True)
            self.staging = None
        if self._created_out_dir and not any(self.out_dir.iterdir()):
            self.out_dir.rmdir()

    def manifest(self) -> Dict[str, Any]:
        files = [{"path": name, "sha256": sha256_digest(self.staging / name)} for name in sorted(self.outputs)]
        files.append({"path": CONFIG_FILE, "sha256": sha256_digest(self.staging / CONFIG_FILE)})
        return {
            "command": self.run_name,
            "argv": self.argv,
            "config": to_jsonable(self.config.to_dict()),
            "version": __version__,
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
            "outputs": files,
            "log": LOG_FILE,
        }

    def _close_log(self):
        if self._log_handler is not None:
            logging.getLogger().removeHandler(self._log_handler)
            self._log_handler.close()
            self._log_handler = None

    def wrap_run(self):
        """
        Wraps the run method to allow for pre- and post-run hooks.
        """

        run_func = self.run

        @wraps(run_func)
        def run_(*args, **kwargs):
            # a malformed configuration fails before anything touches the output directory
            self.config = self.get_config()
            try:
                self.pre_run()
                result = run_func(*args, **kwargs)
                self.post_run(result)
            except BaseException as e:
                self.on_error(e)
                raise
            return result

        return run_
