"""Integration tests -- end-to-end training runs on full-size synthetic verticals"""
