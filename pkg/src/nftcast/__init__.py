"""Top-level package for nftcast."""
