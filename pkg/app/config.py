import os
from dotenv import load_dotenv

load_dotenv()

# Size caps
VERTEX_CAP = int(os.getenv("VERTEX_CAP", "5000000"))
QUADRUPLE_CAP = int(os.getenv("QUADRUPLE_CAP", "10000000"))
GEODESIC_CAP = int(os.getenv("GEODESIC_CAP", "256"))
BOUNDARY_CAP = int(os.getenv("BOUNDARY_CAP", "2000000"))
BFS_WORD_CAP = int(os.getenv("BFS_WORD_CAP", "200000"))
SETTLE_VOLUME_CAP = int(os.getenv("SETTLE_VOLUME_CAP", "200000"))

# Solver budgets
MAX_NODES = int(os.getenv("MAX_NODES", "100000"))
MAX_SECONDS = float(os.getenv("MAX_SECONDS", "60"))

# Run defaults
THREADS = int(os.getenv("THREADS", "1"))
REPORT_DIR = os.getenv("REPORT_DIR", "reports")
DEFAULT_SEED = int(os.getenv("DEFAULT_SEED", "0"))
DOMINATION_BOX = int(os.getenv("DOMINATION_BOX", "8"))
NORM_K_MAX = int(os.getenv("NORM_K_MAX", "3"))
