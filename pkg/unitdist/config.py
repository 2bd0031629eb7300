"""
Configuration.
Defaults live in `configs/unitdist_default.yaml`; the confuse user config and
environment variables are layered on top.

Use double underscore to separate nested values:
https://confuse.readthedocs.io/en/latest/usage.html#environment-variables

# Example:

```bash
export FD_BOUND__SAMPLES=8000
export FD_REGISTRY=/path/to/bounds.registry
```

```python
from unitdist.config import config
print(config["bound"]["samples"].get(int))
```
"""

from pathlib import Path

import confuse

from unitdist.logger import log

REPO_DIR = Path(__file__).resolve().parent.parent
DEFAULT_CONFIG = REPO_DIR / "configs" / "unitdist_default.yaml"
DATA_DIR = Path(__file__).resolve().parent / "data"

config = confuse.Configuration("unitdist")
config.set_file(str(DEFAULT_CONFIG))
config.set_env(prefix="FD")


def registry_path() -> Path:
    """The bounds registry to load: `FD_REGISTRY` / config, else the shipped one."""
    custom = config["registry"].get()
    if custom:
        return Path(str(custom)).expanduser()
    return DATA_DIR / "bounds.registry"


def reload_env() -> None:
    """Re-read the environment, e.g. after a `.env` file was loaded."""
    config.set_env(prefix="FD")
    log.debug("environment overrides reloaded")
