"""Multimodal piano performance data service.

Ingests per-session MIDI, motion capture, video, audio and score assets,
aligns them on a master timeline, and serves synchronized, filterable,
loopable playback views over REST and WebSocket.
"""

__version__ = "0.1.0"
