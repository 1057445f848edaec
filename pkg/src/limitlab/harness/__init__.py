"""Episodes, verification, configuration files, reports and the command line."""
