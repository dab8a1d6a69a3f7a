import os
import sys

# Add project root to python path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from jcm_entanglement.runner.cli import main

if __name__ == "__main__":
    # Defaults to the Bell field-mix scenario when no arguments are given
    argv = sys.argv[1:] or ["--config", "jcm_entanglement/data/scenarios/bell_field_mix.ini"]
    sys.exit(main(argv))
