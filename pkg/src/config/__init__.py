"""
Configuration layer.

settings   - numerical and physical constants
run_config - RunConfig and its JSON codec, SweepSpec
presets    - named figure presets
"""
