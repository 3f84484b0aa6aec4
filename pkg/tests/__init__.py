"""Test modules for the home-service robot twin toolkit."""
