"""Small-step BDI interpreter: configurations, events, plans, and the reasoning cycle."""
