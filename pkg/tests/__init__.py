"""
Test suite for debranges-lab.

- Unit tests: one module per core/data/config component
- Integration tests: CLI runs and the worked-example reproductions
- Fixtures: sample functions, pairs and spec files
"""
