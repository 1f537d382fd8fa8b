# This file makes routes a package
