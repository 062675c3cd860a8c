def summary(count):
    text = 'found ' + count
    print(text)
