"""Figure scripts over minpulse CLI CSV artifacts.

Each script is a pure view over the documented CSV columns: no physics is
recomputed, only regression fits for annotation. All output is vector
graphics (format chosen from the --out extension: .svg, .pdf or .eps).
"""

__version__ = "0.1.0"
