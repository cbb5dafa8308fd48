"""Mid-air hand-pose interaction engine.

Canonicalized hand-landmark windows are embedded into a visible 2D pose
space by a jointly trained autoencoder + gesture classifier, then mapped
onto a 2D music-track space for continuous, human-steered exploration.
"""

from .geometry import CanonicalPose, LandmarkFrame, PalmFrame, canonicalize, palm_frame
from .nets import Autoencoder, Checkpoint, Classifier, GestureClass
from .musicspace import MusicSpace, TrackProfile
from .engine import EngineConfig, InteractionEvent, Session

__all__ = [
    "CanonicalPose", "LandmarkFrame", "PalmFrame", "canonicalize", "palm_frame",
    "Autoencoder", "Checkpoint", "Classifier", "GestureClass",
    "MusicSpace", "TrackProfile",
    "EngineConfig", "InteractionEvent", "Session",
]
