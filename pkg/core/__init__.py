# Core package for HyperBit CLI
