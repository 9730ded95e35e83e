# Tests for compressed-l2gd
