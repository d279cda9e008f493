"""time-stepping schemes for problems with a weak initial singularity"""

__version__ = "0.1.0"
