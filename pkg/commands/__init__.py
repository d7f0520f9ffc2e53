# Commands package for HyperBit CLI
