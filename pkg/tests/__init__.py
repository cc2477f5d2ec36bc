"""make test folder a package for coverage and the regression data folders."""
