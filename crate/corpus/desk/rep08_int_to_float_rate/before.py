def parse_rate(raw):
    rate = int(raw)
    return rate
