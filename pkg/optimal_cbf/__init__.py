from optimal_cbf.app import __version__  # noqa
