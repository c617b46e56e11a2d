import os
import sys

# Let test modules import the standalone oracle helpers next to them.
sys.path.insert(0, os.path.dirname(__file__))
