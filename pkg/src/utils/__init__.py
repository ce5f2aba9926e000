# Utils package for spectrum_ledger
