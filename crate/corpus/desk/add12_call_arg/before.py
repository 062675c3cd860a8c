def dump(data, stream):
    text = json.dumps(data)
    stream.write(text)
