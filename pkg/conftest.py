import sys
from pathlib import Path

# main.py and config_manager.py live at the repository root
sys.path.insert(0, str(Path(__file__).resolve().parent))
