import logging
from pathlib import Path
from threading import Lock

from app import config

logger = logging.getLogger(__name__)


class ReportStore:
    """Process-wide output directory for report files."""
    _instance = None
    _lock = Lock()
    root: Path = None

    def __new__(cls):
        with cls._lock:
            if cls._instance is None:
                cls._instance = super(ReportStore, cls).__new__(cls)
            return cls._instance

    def connect(self, out_dir: str = None) -> Path:
        with self._lock:
            target = Path(out_dir or config.REPORT_DIR)
            if self.root is not None and self.root == target:
                return self.root
            try:
                target.mkdir(parents=True, exist_ok=True)
            except OSError as e:
                logger.error(f"❌ Could not create report directory {target}: {e}")
                raise
            self.root = target
            logger.info(f"✅ Writing reports to {target}")
            return self.root

    def close(self):
        with self._lock:
            self.root = None


report_store = ReportStore()


def get_store() -> Path:
    if report_store.root is None:
        report_store.connect()
    return report_store.root
