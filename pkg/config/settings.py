# config/settings.py - Environment and YAML configuration for spectra, bounds and region tracing
import os
import logging
from pathlib import Path

import yaml
from dotenv import load_dotenv

load_dotenv()

LOG_LEVEL = os.getenv('PARBOUND_LOG_LEVEL', 'INFO').upper()

logging.basicConfig(level=getattr(logging, LOG_LEVEL, logging.INFO),
                    format='%(asctime)s - %(levelname)s - %(message)s')


def _env_int(name: str, default: int, minimum: int = 1) -> int:
    raw = os.getenv(name)
    if raw is None:
        return default
    try:
        return max(minimum, int(raw))
    except ValueError:
        logging.warning(f"[CONFIG] {name}={raw!r} is not an integer | Using {default}")
        return default


# Worker threads for delta grids, SNR sweeps and region grids
PARBOUND_THREADS = _env_int('PARBOUND_THREADS', 1)


# =============================================================================
# YAML Configuration Loader
# =============================================================================

class BoundsConfig:
    """
    Numeric defaults read from bounds_config.yaml

    Sections: quadrature, optimizer, growth, bounds, regions, output. A
    profile such as 'coarse' merges bounds_config.coarse.yaml over the base
    file, key by key.
    """

    def __init__(self, config_file='bounds_config.yaml', profile=None, config_dir=None):
        """
        Args:
            config_file: YAML file name inside config_dir
            profile: optional override profile (PARBOUND_PROFILE)
            config_dir: directory holding the YAML files (default: this package)
        """
        self.config_dir = Path(config_dir) if config_dir else Path(__file__).parent
        self.config_path = self.config_dir / config_file
        self.profile = profile
        self._config = self._read(self.config_path)
        if not self._config:
            logging.warning(f"[CONFIG] No settings in {self.config_path} | Built-in defaults apply")

        if profile:
            override_path = self.config_dir / f"{Path(config_file).stem}.{profile}.yaml"
            overrides = self._read(override_path)
            if overrides:
                self._merge(self._config, overrides)
                logging.info(f"[CONFIG] Profile '{profile}' applied | file={override_path.name}")
            else:
                logging.warning(f"[CONFIG] Profile '{profile}' has no override file {override_path.name}")

    @staticmethod
    def _read(path: Path) -> dict:
        if not path.exists():
            return {}
        with open(path, 'r') as f:
            data = yaml.safe_load(f) or {}
        logging.debug(f"[CONFIG] Loaded {path.name}")
        return data

    @classmethod
    def _merge(cls, base: dict, overrides: dict):
        for key, value in overrides.items():
            if isinstance(base.get(key), dict) and isinstance(value, dict):
                cls._merge(base[key], value)
            else:
                base[key] = value

    def get(self, path, default=None):
        """
        Value at a dot path, e.g. get('bounds.ds2.coarse'); default when any key is absent
        """
        node = self._config
        for key in path.split('.'):
            if not isinstance(node, dict) or key not in node:
                return default
            node = node[key]
        return node

    def section(self, name) -> dict:
        return self._config.get(name) or {}

    @property
    def quadrature(self):
        return self.section('quadrature')

    @property
    def optimizer(self):
        return self.section('optimizer')

    @property
    def growth(self):
        return self.section('growth')

    @property
    def bounds(self):
        return self.section('bounds')

    @property
    def regions(self):
        return self.section('regions')

    @property
    def output(self):
        return self.section('output')


try:
    CONFIG = BoundsConfig(profile=os.getenv('PARBOUND_PROFILE') or None)
except (OSError, yaml.YAMLError) as e:
    logging.error(f"[CONFIG] Failed to load bounds configuration: {e} | Built-in defaults apply")
    CONFIG = BoundsConfig(config_file='__missing__.yaml')
