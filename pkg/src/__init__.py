# Main source package for spectrum_ledger
