"""Interactive smoothness-tuning HTTP service."""
