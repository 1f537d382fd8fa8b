# This file makes app a package
