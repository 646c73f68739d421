"""JSON artifact schemas."""
