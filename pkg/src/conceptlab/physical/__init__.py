from .scenes import Image1D, Marker, Pose, Scene2D, Segment, single_segment_scene
from .render import Contrast, render
from .audio import AudioScene, BandwidthError, FourierSource, mix

__all__ = [
    "Image1D",
    "Marker",
    "Pose",
    "Scene2D",
    "Segment",
    "single_segment_scene",
    "Contrast",
    "render",
    "AudioScene",
    "BandwidthError",
    "FourierSource",
    "mix",
]
