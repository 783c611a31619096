"""Classical processing, temporal order and closed time-like curves in measurement-based patterns."""
