"""Collaborative procedure training engine.

Scenarios are token state machines over a shared object world; mixed
teams of humans and virtual humans perform, synchronize and sometimes
sabotage the procedure while a scoring pass keeps suggesting who should
act next.  Sessions are event-sourced and replayable bit for bit.
"""

__version__ = "0.1.0"
