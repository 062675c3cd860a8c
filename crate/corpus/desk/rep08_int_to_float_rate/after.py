def parse_rate(raw):
    rate = float(raw)
    return rate
