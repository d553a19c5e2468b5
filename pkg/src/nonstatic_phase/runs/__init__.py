from .base import Run
from .commands import FigureRun, PhasesRun, SweepRun, VerifyRun, phase_frame
